"""Source-to-source transformation passes."""
