from setuptools import setup, find_packages

with open('README.md', encoding='utf-8') as readme:
    long_description = readme.read()

setup(
    name='pic_calibration',
    version='1.0.0',
    description='Gradient-based calibration of lossy photonic quantum-walk meshes',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(),
    license='MIT License',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
    ],
    keywords='photonics calibration quantum walk tomography interferometer',
    install_requires=['numpy>=1.17', 'scipy', 'pandas', 'matplotlib', 'six'],
    python_requires='>=3.6',
    entry_points={
        'console_scripts': ['pic-calibration=pic_calibration.cli:main'],
    },
)
