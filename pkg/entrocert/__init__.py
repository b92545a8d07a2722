"""Entropy continuity certification toolkit."""
