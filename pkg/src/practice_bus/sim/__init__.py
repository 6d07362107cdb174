"""
Simulated wall scenes, devices, sensing and navigation noise.

Submodules are imported directly (``practice_bus.sim.scene`` and so on);
``practice_bus.config`` depends on ``sim.geometry``, so this package
re-exports nothing.
"""
