# -*- coding: utf-8 -*-
#
# expertac documentation build configuration file.

import sys
import os

sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.todo',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'expertac'
copyright = u'2026, The expertac developers'

from expertac.version import version
release = version

exclude_patterns = ['_build', 'news']

pygments_style = 'sphinx'

html_theme = 'default'

html_static_path = []

htmlhelp_basename = 'expertacdoc'

latex_elements = {
}

latex_documents = [
  ('index', 'expertac.tex', u'expertac Documentation',
   u'The expertac developers', 'manual'),
]

man_pages = [
    ('index', 'expertac', u'expertac Documentation',
     [u'The expertac developers'], 1)
]
