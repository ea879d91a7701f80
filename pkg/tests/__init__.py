"""Tests for the Stable Limit Lab."""
