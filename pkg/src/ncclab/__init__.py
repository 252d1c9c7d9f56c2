"""Desk-scale lab for systematic data structures, network coding reductions
and multicommodity flow rates.

Modules: ``field`` (GF(p) arithmetic and the fast Fourier transform),
``ds`` (systematic data structures with oracle accounting), ``reduction``
(data structure to coding network pipeline), ``coding`` and ``correction``
(network coding schemes, supervisor augmentation), ``flow`` (concurrent flow
LP), ``circuits`` (netlists and common-bits cuts), ``cli``.
"""

__version__ = "0.1.0"
