# SyndromEst setup script

import setuptools

# optional dependencies for running the unit tests
_EXTRAS_TEST = ["pytest"]

# installation configuration
config = {
    "name": "syndromest",
    "description": "Noise rate estimation from stabilizer syndrome "
                   "statistics",
    "version": "0.1.0",
    "packages": setuptools.find_packages(exclude=("examples", "examples.*")),
    "scripts": [],
    "python_requires": ">=3.8",  # cached_property
    "install_requires": [
        "numpy",
        "scipy",
        "pandas",
        "PyYAML",
    ],
    "extras_require": {
        "test": _EXTRAS_TEST,
        "all": [
            *_EXTRAS_TEST,
        ]
    },
}

# perform setup
setuptools.setup(**config)
