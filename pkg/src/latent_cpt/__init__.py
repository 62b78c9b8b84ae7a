"""Latent-feature CPT pipeline.

Compresses 10 m cone-penetration profiles into ten-dimensional latent vectors
with a from-scratch MLP autoencoder, trains gradient-boosted trees to predict
lateral spreading from site attributes and/or latent features, and explains
the predictions with exact interventional tree Shapley values.
"""

__version__ = "0.1.0"
