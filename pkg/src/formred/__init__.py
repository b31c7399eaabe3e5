"""Formal reduction of linear differential systems at an irregular singular point."""
