"""simulatar: desktop simulation of optical see-through HMD designs.

Blends 2D UI designs onto first-person context videos with additive-light
and field-of-view corrections, and ships the TOST equivalence statistics
used to validate simulator-vs-headset rating studies.
"""

__version__ = "0.1.0"
