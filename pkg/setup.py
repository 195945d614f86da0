from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name='fvflow',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=['joblib',
                      'numpy',
                      'pandas',
                      'scipy',
                      'tqdm'],
    extras_require={'tests': ['pytest']},
    entry_points={
        'console_scripts': ['fvflow=fvflow.cli:main'],
    },
    license='MIT',
    description='Finite volume solvers for hyperbolic conservation laws: '
                'advection, acoustics and the Euler equations.',
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3.6"
    ],
)
