# Sphinx configuration for practice-bus.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
from datetime import datetime

sys.path.insert(0, os.path.abspath("../src"))

from practice_bus._version import __version__  # noqa: E402

project = "practice-bus"
copyright = "2025, aa-parky"
author = "aa-parky"
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",  # Google-style docstrings
    "sphinx.ext.viewcode",
    "sphinx.ext.intersphinx",
    "sphinx.ext.autosummary",
    "myst_parser",  # README-style Markdown pages
]

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
source_suffix = {".rst": "restructuredtext", ".md": "markdown"}

html_theme = "sphinx_rtd_theme"
html_last_updated_fmt = "%Y-%m-%d %H:%M:%S UTC"
html_context = {"build_date": datetime.now().strftime("%Y-%m-%d %H:%M:%S UTC")}

autodoc_default_options = {
    "members": True,
    "undoc-members": True,
    "show-inheritance": True,
}
autosummary_generate = True
napoleon_google_docstring = True
napoleon_numpy_docstring = False

# links in Markdown pages point at the repository, not at other doc pages
myst_all_links_external = True

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
}
