"""HTTP surface for drawdown-optimizer (optional ``api`` extra)."""
