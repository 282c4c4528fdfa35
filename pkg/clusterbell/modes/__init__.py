"""Command families: games, bounds, tomography and noise fitting."""
