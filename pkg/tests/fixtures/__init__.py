"""
Test fixtures package for PyFixMsg Plus testing framework.
"""
from .test_fixtures import *
