"""Research assistant platform: curated task assistants over scholarly tools,
with provenance-tracked assets and RO-Crate / LaTeX export."""

__version__ = "0.1.0"
