"""
ITM laboratory: exact and Monte Carlo checks for interval translation mappings,
their induction cocycles, S-adic codings and explicit eigenvalue constructions.
"""
# Run the command line with `python -m src.main`.
