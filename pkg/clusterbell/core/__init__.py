"""Core engines shared by every command: Pauli algebra, circuits, simulation, noise."""
