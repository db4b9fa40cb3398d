"""The test module for fusedbregman."""
