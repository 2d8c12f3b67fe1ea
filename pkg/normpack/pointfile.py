# -*- coding: utf-8 -*-

"""
normpack.pointfile
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module reads and writes the plain text files used to inspect samples,
graphs and packings outside of Python.

A point/graph file holds vertex and edge lines,

    v <index> <x_1> ... <x_d>
    e <i> <j>

and a packing file holds one center per line. Both may start with header
lines

    # body <JSON body specification>
    # L <side length>

Coordinates are written with repr() so that reading a file back gives the
same floats.
"""

import json
import logging

import numpy as np

from .input_types import body_from_spec
from .packing import TorusDomain

logger = logging.getLogger(__name__)

class MalformedPointFileException(Exception):
    """
        This class exists to indicate errors while processing point, graph
        and packing files.
    """
    pass

def _header_lines(body, domain):

    lines = []

    if body is not None:
        lines.append("# body {}".format(json.dumps(body.to_dict(), sort_keys=True)))

    if domain is not None:
        lines.append("# L {!r}".format(domain.L))

    return lines

def _parse_header(line, linenumber, header):

    content = line[1:].strip()

    if content.startswith("body "):
        try:
            header["body"] = json.loads(content[len("body "):])
        except json.JSONDecodeError:
            raise MalformedPointFileException(
                "issue at line {} while reading the body header".format(linenumber))

    elif content.startswith("L "):
        try:
            header["L"] = float(content[len("L "):])
        except ValueError:
            raise MalformedPointFileException(
                "issue at line {} while reading the side length".format(linenumber))

def _finish_header(header):

    body = body_from_spec(header["body"]) if "body" in header else None
    domain = None

    if "L" in header:
        if body is None:
            raise MalformedPointFileException(
                "a side length header needs a body header for the dimension")

        domain = TorusDomain(body.dim, header["L"])

    return body, domain

def write_point_graph(filename, points, edges=None, body=None, domain=None):
    """Writes vertices and, optionally, edges."""

    points = np.asarray(points, dtype=float)

    with open(filename, 'w') as outputfile:

        for line in _header_lines(body, domain):
            outputfile.write(line + "\n")

        for index, point in enumerate(points):
            outputfile.write("v {} {}\n".format(index,
                " ".join(repr(float(value)) for value in point)))

        if edges is not None:
            for first, second in np.asarray(edges, dtype=np.int64).reshape(-1, 2):
                outputfile.write("e {} {}\n".format(first, second))

def read_point_graph(filename):
    """Returns (points, edges, body, domain); body and domain are None
    without headers.
    """

    vertices = {}
    edges = []
    header = {}

    with open(filename) as inputfile:

        for linenumber, line in enumerate(inputfile, start=1):

            line = line.strip()

            if not line:
                continue

            if line.startswith("#"):
                _parse_header(line, linenumber, header)
                continue

            fields = line.split()

            try:
                if fields[0] == "v":
                    vertices[int(fields[1])] = [ float(value) for value in fields[2:] ]

                elif fields[0] == "e":
                    edges.append((int(fields[1]), int(fields[2])))

                else:
                    raise MalformedPointFileException(
                        "issue at line {}: unknown record type {}".format(
                            linenumber, fields[0]))

            except (IndexError, ValueError):
                raise MalformedPointFileException(
                    "issue at line {} while reading a {} record".format(
                        linenumber, fields[0]))

    if sorted(vertices) != list(range(len(vertices))):
        raise MalformedPointFileException(
            "vertex indices must be 0..n-1 without gaps")

    dimensions = set(len(coordinates) for coordinates in vertices.values())

    if len(dimensions) > 1:
        raise MalformedPointFileException(
            "vertices have mixed dimensions {}".format(sorted(dimensions)))

    for first, second in edges:
        if first not in vertices or second not in vertices:
            raise MalformedPointFileException(
                "edge ({}, {}) refers to a missing vertex".format(first, second))

    body, domain = _finish_header(header)
    d = dimensions.pop() if dimensions else (body.dim if body else 0)

    points = np.array([ vertices[index] for index in range(len(vertices)) ],
        dtype=float).reshape(-1, d)

    return points, np.array(edges, dtype=np.int64).reshape(-1, 2), body, domain

def write_packing(filename, centers, body, domain):
    """Writes packing centers under a body and side length header."""

    centers = np.asarray(centers, dtype=float).reshape(-1, body.dim)

    with open(filename, 'w') as outputfile:

        for line in _header_lines(body, domain):
            outputfile.write(line + "\n")

        for center in centers:
            outputfile.write(" ".join(repr(float(value)) for value in center) + "\n")

    logger.info("wrote {} packing centers to {}".format(centers.shape[0], filename))

def read_packing(filename):
    """Returns (centers, body, domain) from a packing file."""

    rows = []
    header = {}

    with open(filename) as inputfile:

        for linenumber, line in enumerate(inputfile, start=1):

            line = line.strip()

            if not line:
                continue

            if line.startswith("#"):
                _parse_header(line, linenumber, header)
                continue

            try:
                rows.append([ float(value) for value in line.split() ])
            except ValueError:
                raise MalformedPointFileException(
                    "issue at line {} while reading a center".format(linenumber))

    body, domain = _finish_header(header)

    if body is None or domain is None:
        raise MalformedPointFileException(
            "a packing file needs both the body and the L header")

    if any(len(row) != body.dim for row in rows):
        raise MalformedPointFileException(
            "every center must have {} coordinates".format(body.dim))

    return np.array(rows, dtype=float).reshape(-1, body.dim), body, domain
