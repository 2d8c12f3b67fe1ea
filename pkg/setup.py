from setuptools import setup
from os import path

# to get pylint to shut up
__appname__ = None
__appversion__ = None

# __appname__ and __appversion__ come from here
exec(open("normpack/version.py").read())

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name=__appname__.lower(),
    version=__appversion__,
    description='Randomized packings of convex bodies through Poisson '
        'sampling, graph pruning and independent sets',
    long_description_content_type="text/markdown",
    long_description=long_description,
    license='MIT',
    packages=['normpack'],
    python_requires='>=3.8',
    scripts=[
        'bin/pack',
        'bin/vol',
        'bin/verify'
    ],
    install_requires=[
        'networkx',
        'numpy',
        'scipy'
    ],
    tests_require=[
        'hypothesis'
    ],
    test_suite="tests",
    zip_safe=True,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
    ],
    keywords='packing convex-bodies geometry monte-carlo independent-set'
    )
