"""
Backward compatibility setup.py for the randomized low-rank toolkit.
For modern installations, use pyproject.toml.
"""
from setuptools import setup

# For compatibility with older pip versions
setup()
