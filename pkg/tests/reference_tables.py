"""Published reference values for the 108-cell experiment grid.

Rows are keyed by (delta, m); each row lists 12 cells ordered by
sigma fraction (0.05, 0.25, 0.45, 0.65) and, within each, by local
fraction (1/10, 1/5, 1/3).
"""

import math

INF = math.inf
SIGMAS = (0.05, 0.25, 0.45, 0.65)
LOCALS = (1 / 10, 1 / 5, 1 / 3)

_FINAL_ACTION = {
    (0.25, 1): ".737 .824 .819 .681 .692 .709 .652 .673 .668 .678 .715 .696",
    (0.25, 3): ".892 .891 .901 .823 .839 .832 .789 .789 .792 .767 .767 .795",
    (0.25, INF): ".945 .954 .962 .898 .915 .917 .901 .893 .902 .877 .885 .893",
    (0.5, 1): ".743 .824 .829 .650 .707 .706 .667 .678 .693 .677 .711 .696",
    (0.5, 3): ".901 .909 .908 .843 .839 .835 .816 .810 .822 .789 .812 .789",
    (0.5, INF): ".960 .964 .966 .925 .925 .929 .899 .918 .903 .899 .902 .908",
    (0.75, 1): ".733 .828 .843 .659 .700 .707 .653 .669 .688 .683 .692 .710",
    (0.75, 3): ".917 .924 .916 .863 .851 .833 .817 .808 .825 .802 .794 .804",
    (0.75, INF): ".961 .967 .956 .932 .935 .925 .915 .915 .909 .912 .904 .899",
}

_EXCESS_PROBABILITY = {
    (0.25, 1): ".012 .034 .045 .037 .050 .076 .122 .119 .138 .193 .194 .212",
    (0.25, 3): ".047 .053 .053 .082 .112 .129 .136 .151 .162 .163 .184 .203",
    (0.25, INF): ".077 .077 .052 .106 .140 .143 .157 .167 .175 .188 .195 .209",
    (0.5, 1): ".018 .030 .047 .033 .050 .076 .120 .119 .130 .196 .206 .211",
    (0.5, 3): ".043 .048 .042 .107 .112 .125 .149 .160 .166 .202 .215 .217",
    (0.5, INF): ".059 .050 .044 .131 .134 .121 .168 .184 .170 .204 .194 .200",
    (0.75, 1): ".014 .033 .045 .033 .049 .075 .110 .125 .134 .190 .202 .216",
    (0.75, 3): ".037 .030 .031 .102 .108 .105 .178 .176 .172 .217 .212 .225",
    (0.75, INF): ".042 .038 .034 .115 .111 .104 .163 .160 .167 .199 .198 .178",
}

_AVERAGE_EXCESS = {
    (0.25, 1): ".013 .015 .013 .094 .073 .074 .211 .200 .190 .297 .316 .293",
    (0.25, 3): ".007 .009 .008 .040 .045 .044 .081 .083 .085 .130 .129 .137",
    (0.25, INF): ".005 .005 .005 .027 .025 .026 .047 .049 .052 .072 .075 .072",
    (0.5, 1): ".010 .014 .015 .100 .078 .071 .216 .208 .187 .299 .304 .299",
    (0.5, 3): ".008 .008 .007 .043 .045 .042 .085 .088 .090 .130 .135 .132",
    (0.5, INF): ".005 .005 .005 .028 .028 .025 .047 .050 .053 .075 .070 .077",
    (0.75, 1): ".011 .014 .014 .099 .072 .071 .209 .199 .193 .311 .305 .305",
    (0.75, 3): ".007 .007 .009 .044 .043 .045 .087 .087 .094 .138 .140 .142",
    (0.75, INF): ".005 .005 .006 .024 .025 .026 .050 .048 .051 .072 .073 .074",
}


def _expand(rows):
    table = {}
    for (delta, m), text in rows.items():
        values = [float(v) for v in text.split()]
        cells = [(s, lf) for s in SIGMAS for lf in LOCALS]
        for (s, lf), v in zip(cells, values, strict=True):
            table[(delta, m, lf, s)] = v
    return table


# keyed by (delta, m, local_fraction, sigma_fraction)
FINAL_ACTION = _expand(_FINAL_ACTION)
EXCESS_PROBABILITY = _expand(_EXCESS_PROBABILITY)
AVERAGE_EXCESS = _expand(_AVERAGE_EXCESS)


def lookup(table, delta, m, local_fraction, sigma_fraction):
    for (d, mm, lf, s), v in table.items():
        if (d == delta and mm == m and math.isclose(lf, local_fraction)
                and math.isclose(s, sigma_fraction)):
            return v
    raise KeyError((delta, m, local_fraction, sigma_fraction))
