# -*- coding: utf-8 -*-

"""
normpack.output_types
~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

This module supplies the functions for exporting results to different output
types.
"""

import logging

logger = logging.getLogger(__name__)

def output_jsonl(outputfile, recordmodel):
    recordmodel.save_as_JSONL(outputfile)

def output_json(outputfile, recordmodel):
    recordmodel.save_as_JSON(outputfile)

def output_csv(outputfile, recordmodel):
    recordmodel.save_as_CSV(outputfile)

supported_output_types = {
    'jsonl': output_jsonl,
    'json': output_json,
    'csv': output_csv
}

def write_output(output_type, outputfile, recordmodel):

    logger.info("writing {} output to {}".format(output_type, outputfile))
    supported_output_types[output_type](outputfile, recordmodel)
