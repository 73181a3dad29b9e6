"""sqlite run registry."""
