from setuptools import setup, find_packages

setup(
    name="pybrex",
    version="0.1.0",
    description="Exact continuous relaxations of l0-regularized least squares and Kullback-Leibler problems",
    packages=find_packages(exclude=("tests", "tests.*")),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.11",
        "aiosqlite>=0.21.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.4",
            "pytest-cov>=4.1",
            "pytest-asyncio>=0.24",
            "hypothesis>=6.90",
        ],
    },
    entry_points={
        "console_scripts": [
            "pybrex = pybrex.harness.cli:main",
        ],
    },
)
