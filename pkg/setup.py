"""Setup script for the pyras-sim package."""

from setuptools import find_packages, setup

# Read version from __version.py
with open("pyras/__version.py", encoding="utf-8") as f:
    exec(f.read())

with open("README.md", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="pyras-sim",
    version=__version__,  # type: ignore[name-defined]  # noqa: F821
    description="Datacenter capacity reservation simulator.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "docs"]),
    install_requires=[
        "numpy>=1.26.0",
        "pandas>=2.2.0",
    ],
    extras_require={
        "dev": [
            "pytest>=8.0.0",
            "pytest-asyncio>=0.23.0",
            "pytest-cov>=5.0.0",
            "black>=24.0.0",
            "isort>=5.0.0",
            "ruff>=0.3.0",
        ],
        "docs": [
            "mkdocs>=1.5.0",
            "mkdocs-material>=9.0.0",
            "mkdocstrings[python]>=0.24.0",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
    python_requires=">=3.12",
    include_package_data=True,
    package_data={
        "pyras": ["py.typed", "data/*.ini"],
    },
    keywords=["datacenter", "capacity", "reservation", "simulation", "ppo"],
)
