"""hlg: exact-arithmetic workbench for hairy Lie graph spaces and trace maps."""

__version__ = "0.1.0"
