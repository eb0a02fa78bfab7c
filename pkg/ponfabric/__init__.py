"""
PON data-center fabric toolkit.
Models two-plane cascaded-AWGR fabrics, assigns wavelengths and TDM time
slots to rack/OLT pairs, validates assignment tables and simulates frames.
"""
__version__ = "1.0.0"
