"""haekit: Height Above Ellipsoid as the hub vertical datum for low-altitude airspace."""

__version__ = "0.1.0"
