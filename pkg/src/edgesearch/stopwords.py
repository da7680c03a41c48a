"""Embedded English stopword list.

A fixed list of about 180 words is embedded rather than configurable so
that keyword extraction, indexing, and the evaluation harness are
reproducible across deployments. Membership checks should go through
is_stopword(), which also strips dots so "etc." and "e.g." are caught.
"""

STOPWORDS = frozenset("""
a about above after again against all also although always am among an
and any anyone are around as at be because been before being below
beside best between both but by can cannot could did do does doing down
during each eg either else especially etc even every few for from given
had has have having he her here hers herself him himself his how
however i ie if in instead into is it its itself just many may me might
more most much must my myself neither never next no nor not now of off
often on once only onto or other others our ours ourselves out over own
per rather said same several shall she should since so some such than
that the their theirs them themselves then there therefore these they
this those through thus to together too toward under until up upon us
used usually various very via was we well were what when where whether
which while who whom whose why will with within without would you your
yours yourself yourselves
""".split())


def is_stopword(token: str) -> bool:
    low = token.lower()
    return low in STOPWORDS or low.replace(".", "") in STOPWORDS
