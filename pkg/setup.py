import codecs
import os

import setuptools

here = os.path.abspath(os.path.dirname(__file__))

# Get the long description from the README file
with codecs.open(os.path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

requires = [
    "django>=4.2,<6",
    "numpy>=1.22",
    "scipy>=1.9",
    "openpyxl>=3.0",
    "progress>=1.5",
]

setuptools.setup(
    name='gpmle',
    version='0.1.0',

    description='Gaussian process interpolation with hardened maximum '
                'likelihood estimation, and a benchmark of MLE schemes',
    long_description=long_description,

    license='MPL2',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: Django',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)',
        'Programming Language :: Python :: Implementation :: CPython',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],

    keywords='gaussian-process kriging maximum-likelihood benchmark',
    packages=setuptools.find_packages(exclude=['contrib', 'docs', 'tests',
                                               'examples', 'examples.*']),

    python_requires='>=3.9',

    install_requires=requires,
    extras_require={
        'test': [
            'pycodestyle>=2.9',
        ],
    },
    entry_points={
        'console_scripts': [
            'bench = gpmle.management.commands.bench:main',
        ],
    },
)
