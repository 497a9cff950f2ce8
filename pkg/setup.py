from setuptools import setup

with open("README.md") as fh:
    long_description = ""
    header_count = 0
    for line in fh:
        if line.startswith("##"):
            header_count += 1
        if header_count < 2:
            long_description += line
        else:
            break

extras = {"testing": ["pytest>=7.0.1"]}

setup(
    name="weakhyp",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    version="0.1.0",
    keywords="hyperbolic systems, energy estimates, symmetriser, gevrey, well-posedness",
    description="Numerical analyzer for weakly hyperbolic first order systems with time dependent coefficients",
    extras_require=extras,
    packages=["weakhyp", "weakhyp.utils", "weakhyp.scenarios"],
    package_data={"weakhyp.scenarios": ["*.json"]},
    license="Apache",
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=[
        "numpy>=1.18.0",
        "scipy>=1.6",
        "h5py",
    ],
    entry_points={"console_scripts": ["weakhyp=weakhyp.cli:main"]},
    python_requires=">=3.8",
    tests_require=extras["testing"],
)
