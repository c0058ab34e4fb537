"""verifide: incremental verification engine for the MiniSpec language."""

__version__ = "0.1.0"
