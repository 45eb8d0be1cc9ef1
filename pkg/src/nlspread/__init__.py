"""Spreading speeds and propagation direction for a two-component nonlocal epidemic model."""
