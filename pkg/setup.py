"""A setuptools based setup module.
See:
https://packaging.python.org/en/latest/distributing.html
https://github.com/pypa/sampleproject
"""

# Always prefer setuptools over distutils
from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='qterm',

    # Versions should comply with PEP440.  For a discussion on single-sourcing
    # the version across setup.py and the project code, see
    # https://packaging.python.org/en/latest/single_source_version.html
    version='0.1.0',

    description=(
        'Termination checking for nondeterministic quantum programs'
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",

    # Author details
    author='Darcy Jones',
    author_email='darcy.a.jones@curtin.edu.au',

    # Choose your license
    license='GPLv3',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ],

    # What does your project relate to?
    keywords='quantum-programs termination verification linear-algebra',

    packages=find_packages('src'),
    package_dir={'': 'src'},

    # All of the linear algebra is plain numpy. joblib spreads independent
    # subspace computations over threads.
    install_requires=[
        'numpy>=1.17.0',
        'joblib',
        ],

    # $ pip install -e .[dev,test]
    extras_require={
        'dev': ['check-manifest', 'mypy'],
        'test': ['coverage', 'pytest', 'hypothesis', 'mypy'],
    },

    package_data={
        'qterm': ['**.json'],
    },
    include_package_data=True,

    entry_points={
        'console_scripts': [
            'qterm=qterm.main:main',
        ],
    },
)
