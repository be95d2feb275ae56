"""belief-fluid CLI entry point."""
