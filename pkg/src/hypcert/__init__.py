"""hypcert: hyperbolic-geometry toolkit.

Packing and covering numbers, four-point hyperbolicity estimation,
isometry classification, ping-pong free-group certificates, and
entropy/systole bound checks on three concrete model spaces: the upper
half-plane, free-group Cayley trees, and finite metric graphs.
"""

__version__ = "0.1.0"
