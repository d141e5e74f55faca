from setuptools import setup, find_packages

setup(
    name="himdiag",
    version="1.0.0",
    description="High-dimensional influence diagnostics for regression and classification",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=1.5.0",
        "python-dotenv==1.0.0",
        "pydantic==2.5.0",
        "pydantic-settings==2.0.3",
        "celery==5.3.4",
        "redis==5.0.1",
    ],
    python_requires=">=3.8",
    extras_require={
        "dev": [
            "pytest>=7.4.3",
            "pytest-mock>=3.12.0",
            "black>=23.11.0",
            "mypy>=1.7.1",
        ]
    },
    entry_points={
        "console_scripts": [
            "himdiag=himdiag.cli.main:main",
        ]
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
