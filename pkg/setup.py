from setuptools import setup

with open('README.rst') as f:
    long_description = f.read()

version = {}
with open('expertac/version.py') as f:
    exec(f.read(), version)

setup(name='expertac',
    author='The expertac developers',
    description="expert-augmented actor-critic with a Kronecker-factored natural gradient on sparse-reward grids",
    long_description=long_description,
    long_description_content_type="text/x-rst",
    version=version['version'],
    license='GNU General Public License, version 2',
    packages = ['expertac', 'expertac.environment', 'expertac.learning', 'expertac.harness', 'expertac.graphical'],
    package_data = {'expertac.environment': ['maps/*.grid']},
    install_requires = ['numpy>=1.22', 'scipy', 'matplotlib>=3.5'],
    extras_require = {'test': ['pytest', 'pytest-xdist']},
    setup_requires = ['wheel'],
    include_package_data = True,
    python_requires = '>=3.9',
    entry_points = {'console_scripts': ['expertac = expertac.cli:main']},
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
      ],
    keywords='reinforcement learning, actor-critic, natural gradient, K-FAC, learning from demonstrations, sparse rewards',
)
