# Sphinx configuration of the libbicmshaping documentation.
#
# The API pages under source/ are generated by autodoc from the Google style
# docstrings; the narrative pages are markdown, rendered by recommonmark.

import os
import sys

from recommonmark.transform import AutoStructify

# The package is documented from the checkout, not from an installed copy.
sys.path.insert(0, os.path.abspath('../'))

import libbicmshaping  # pylint: disable=wrong-import-position


# -- Project information -----------------------------------------------------

project = 'libbicmshaping'
copyright = '2020, Google'
author = 'Google'
version = libbicmshaping.__version__
release = libbicmshaping.__version__


# -- General configuration ---------------------------------------------------

extensions = [
    'recommonmark',
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx_autodoc_typehints',
]

# docs/requirements.txt does not install the numerical stack.
autodoc_mock_imports = ['numpy', 'scipy']
autodoc_member_order = 'bysource'
napoleon_google_docstring = True
napoleon_numpy_docstring = False

master_doc = 'index'
templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_title = 'libbicmshaping: shaped BICM, MLC and CM rates'

github_doc_root = 'docs/'


def setup(app):
  app.add_config_value('recommonmark_config', {
      'enable_auto_doc_ref': False,
      'enable_eval_rst': True,
  }, True)
  app.add_transform(AutoStructify)
