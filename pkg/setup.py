#!/usr/bin/env python3
"""Setup script for drawdown-optimizer."""

from pathlib import Path

from setuptools import find_packages, setup

readme_file = Path(__file__).parent / "README.md"
long_description = readme_file.read_text() if readme_file.exists() else ""

# Runtime requirements are the first block of requirements.txt
requirements_file = Path(__file__).parent / "requirements.txt"
requirements = []
if requirements_file.exists():
    for line in requirements_file.read_text().splitlines():
        if line.startswith("# Development"):
            break
        if line.strip() and not line.startswith("#"):
            requirements.append(line.strip())
else:
    requirements = [
        "numpy>=1.24",
        "scipy>=1.10",
        "PyYAML>=6.0.1",
        "pydantic>=2.5.0",
        "pydantic-settings>=2.1.0",
    ]

setup(
    name="drawdown-optimizer",
    version="0.1.0",
    description="Minimum probability of drawdown and optimal investment under a wealth-dependent payout rate",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={
        "drawdown_optimizer": ["problems/*.yaml"],
    },
    include_package_data=True,
    python_requires=">=3.9",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
            "black>=23.0.0",
            "ruff>=0.1.0",
            "mypy>=1.0.0",
        ],
        "api": [
            "fastapi>=0.109.0",
            "uvicorn[standard]>=0.27.0",
            "slowapi>=0.1.9",
            "httpx>=0.25.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "drawdown-optimizer=drawdown_optimizer.cli:main",
            "ddopt=drawdown_optimizer.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: OS Independent",
    ],
    keywords="drawdown, stochastic control, hjb, monte carlo, scale function",
)
