# Package marker for unit tests.
