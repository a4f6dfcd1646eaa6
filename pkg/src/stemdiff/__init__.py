"""Desk-scale latent-diffusion accompaniment engine on synthetic multi-track data."""

__version__ = "0.1.0"
