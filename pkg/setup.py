#!/usr/bin/env python

from setuptools import setup

setup(
    name = "dimer",
    version = "1.0.0",
    description = "Steady states and cooling protocols of a driven, "
                  "dissipative two-qubit cavity dimer",
    packages = ["dimer"],
    test_suite = "tests",
    python_requires = ">=3.8",

    install_requires = [
        "numpy>=1.22",
        "scipy>=1.12"
        ],

    classifiers = [
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics"
        ],

    entry_points = {
        "console_scripts" : [
            "dimer = dimer.control:main"
        ]
    }
)
