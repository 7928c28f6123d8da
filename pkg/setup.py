#!/usr/bin/env python3

'''

   Copyright 2026 The relitcamo Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.

'''

from setuptools import setup

setup(  name="relitcamo",
        version='0.1.0.dev0',
        description="Relightable adversarial camouflage for gaussian splat scenes, optimized over the hard physical configurations.",
        author='The relitcamo Authors',
        license="Apache 2.0",
        packages=[
                    'relitcamo',
                    'relitcamo.analysis',
                    'relitcamo.attack',
                    'relitcamo.detect',
                    'relitcamo.render',
                    'relitcamo.scene',
                    ],
        install_requires=[
                    'numpy>=1.22',
                    'tqdm>=4.60',
                    ],
        extras_require={
                    'tests' : [ 'pytest>=7', 'hypothesis>=6' ],
                    },
        entry_points={
                    'console_scripts' : [ 'relitcamo = relitcamo.console:main' ],
                    },
        classifiers=[
            # How mature is this project? Common values are
            #   3 - Alpha
            #   4 - Beta
            #   5 - Production/Stable
            'Development Status :: 3 - Alpha',

            'Intended Audience :: Science/Research',

            'License :: OSI Approved :: Apache Software License',

            'Programming Language :: Python :: 3',
            'Programming Language :: Python :: 3.9',
            'Programming Language :: Python :: 3.10',
            'Programming Language :: Python :: 3.11',
            'Programming Language :: Python :: 3.12',
        ],
        python_requires='>=3.9',
)

