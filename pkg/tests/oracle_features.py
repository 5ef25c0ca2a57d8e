"""Standalone oracle for the feature-extraction fixture expectations.

Computes the verbal-abuse performance block (52 values) and the full chat
family (60 values) for the fixture case in test_features.py with explicit
straight-line arithmetic: no imports from the package's feature code.  Run
directly to print the frozen literals used by the tests:

    python tests/oracle_features.py
"""

import math

# --- fixture case definition (mirrors test_features.fixture_case) ---------
# Two matches, both with verbal_abuse as plurality category.
#
# Match 1: duration 1800, offender lost.
#   offender: k5 d4 a3, dd 9000, dr 16000, gold 7200, time 1800
#   allies:   (k,d,a) = (2,3,4), (1,5,2), (4,2,6), (3,4,1)
#             dd 10000+1000*i, dr 12000+500*i, gold 6000+400*i, time 1800
#   enemies:  (k,d,a) = (5,1,7), (2,2,3), (6,3,2), (1,4,5), (3,2,4)
#             dd 11000+900*i, dr 10000+300*i, gold 7000+250*i, time 1800
#   reports: ally verbal_abuse (comment), ally verbal_abuse, enemy spamming
#   chat: off "noob noob stfu", ally "gg", enemy "nice", off "report"
# Match 2: duration 2400, offender won.
#   offender: k2 d7 a1, dd 8000, dr 18000, gold 8000, time 2100
#   allies:   (k,d,a) = (3,3,3), (2,4,5), (5,1,2), (1,2,6)
#             dd 9500+800*i, dr 13000+600*i, gold 7000+350*i, time 2400
#   enemies:  (k,d,a) = (4,2,6), (3,3,1), (2,5,3), (6,1,4), (5,2,2)
#             dd 12000+700*i, dr 9000+450*i, gold 7500+300*i, time 2400
#   reports: enemy verbal_abuse (comment), ally verbal_abuse,
#            ally intentional_feeding  (verbal_abuse is the strict plurality)
#   chat: off "bad bad good", ally "noob", off "gg"
#
# Lexicon for the chat family: good 7.0, bad 3.0, noob 2.0, gg 5.0
# (stfu, report, nice are NOT in this lexicon).

M1 = {
    "duration": 1800,
    "lost": True,
    "off": (5, 4, 3, 9000, 16000, 7200, 1800),
    "allies": [
        (2, 3, 4, 10000, 12000, 6000, 1800),
        (1, 5, 2, 11000, 12500, 6400, 1800),
        (4, 2, 6, 12000, 13000, 6800, 1800),
        (3, 4, 1, 13000, 13500, 7200, 1800),
    ],
    "enemies": [
        (5, 1, 7, 11000, 10000, 7000, 1800),
        (2, 2, 3, 11900, 10300, 7250, 1800),
        (6, 3, 2, 12800, 10600, 7500, 1800),
        (1, 4, 5, 13700, 10900, 7750, 1800),
        (3, 2, 4, 14600, 11200, 8000, 1800),
    ],
}
M2 = {
    "duration": 2400,
    "lost": False,
    "off": (2, 7, 1, 8000, 18000, 8000, 2100),
    "allies": [
        (3, 3, 3, 9500, 13000, 7000, 2400),
        (2, 4, 5, 10300, 13600, 7350, 2400),
        (5, 1, 2, 11100, 14200, 7700, 2400),
        (1, 2, 6, 11900, 14800, 8050, 2400),
    ],
    "enemies": [
        (4, 2, 6, 12000, 9000, 7500, 2400),
        (3, 3, 1, 12700, 9450, 7800, 2400),
        (2, 5, 3, 13400, 9900, 8100, 2400),
        (6, 1, 4, 14100, 10350, 8400, 2400),
        (5, 2, 2, 14800, 10800, 8700, 2400),
    ],
}

LEX = {"good": 7.0, "bad": 3.0, "noob": 2.0, "gg": 5.0}


def mean(xs):
    return sum(xs) / len(xs)


def pstd(xs):
    mu = mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / len(xs))


def mean_std_pairs(per_match_values):
    out = []
    for stat_values in zip(*per_match_values):
        ordered = sorted(stat_values)
        out.append(mean(ordered))
        out.append(pstd(ordered))
    return out


def offender_scalars(m):
    k, d, a, dd, dr, gold, time = m["off"]
    kda = (k + a) / (d + 1)
    gpm = gold * 60 / m["duration"]
    return [k, d, a, kda, dd, dr, gold, gpm, time]


def team_scalars(m, side):
    rows = m[side]
    n = len(rows)
    kills = sum(r[0] for r in rows)
    deaths = sum(r[1] for r in rows)
    assists = sum(r[2] for r in rows)
    kda_team = (kills + assists) / (deaths + 1)
    kda_pp = mean([(r[0] + r[2]) / (r[1] + 1) for r in rows])
    dd_pp = mean([r[3] for r in rows])
    dr_pp = mean([r[4] for r in rows])
    gpm_pp = mean([r[5] * 60 / m["duration"] for r in rows])
    return [kills / n, deaths / n, assists / n, kda_team, kda_pp, dd_pp, dr_pp, gpm_pp]


def performance_block():
    matches = [M1, M2]
    values = []
    values += mean_std_pairs([offender_scalars(m) for m in matches])
    values += mean_std_pairs([team_scalars(m, "allies") for m in matches])
    values += mean_std_pairs([team_scalars(m, "enemies") for m in matches])
    values.append(float(len(matches)))
    values.append(mean([1.0 if m["lost"] else 0.0 for m in matches]))
    return values


def score(words):
    hits = [LEX[w] for w in words if w in LEX]
    return sum(hits) / len(hits) if hits else 0.0


def report_block():
    # Match 1 reports: ally verbal_abuse (comment), ally verbal_abuse,
    #                  enemy spamming.
    # Match 2 reports: enemy verbal_abuse (comment), ally verbal_abuse,
    #                  ally intentional_feeding.
    # Both matches fall in the verbal_abuse group; counts cover every report
    # in the match regardless of its own category.
    m1 = {"ally": 2, "enemy": 1, "ally_commented": 1, "enemy_commented": 0}
    m2 = {"ally": 2, "enemy": 1, "ally_commented": 0, "enemy_commented": 1}
    return [
        mean([m1["ally"], m2["ally"]]),
        mean([m1["enemy"], m2["enemy"]]),
        mean([m1["ally_commented"], m2["ally_commented"]]),
        mean([m1["enemy_commented"], m2["enemy_commented"]]),
    ]


def chat_family():
    # Match 1 chat: offender ["noob","noob","stfu"] + ["report"]; ally ["gg"]; enemy ["nice"]
    # Match 2 chat: offender ["bad","bad","good"] + ["gg"]; ally ["noob"]
    m1_off = ["noob", "noob", "stfu", "report"]
    m1_ally = ["gg"]
    m1_enemy = ["nice"]
    m2_off = ["bad", "bad", "good", "gg"]
    m2_ally = ["noob"]
    m2_enemy = []

    # Both matches group under verbal_abuse (communication category).
    # Match 1 report sources: ally, ally, enemy -> mixed -> victims = everyone,
    # bystanders = nobody. Match 2 sources: enemy, ally, ally -> mixed too.
    off_v = [score(m1_off), score(m2_off)]
    victim_v = [score(m1_ally + m1_enemy), score(m2_ally + m2_enemy)]
    bystander_v = [0.0, 0.0]
    off_counts = [2.0, 2.0]
    total_counts = [4.0, 3.0]

    block = []
    ordered = sorted(off_v)
    block += [mean(ordered), pstd(ordered)]
    block.append(mean(sorted(victim_v)))
    block.append(mean(sorted(bystander_v)))
    ordered = sorted(off_counts)
    block += [mean(ordered), pstd(ordered)]
    ordered = sorted(total_counts)
    block += [mean(ordered), pstd(ordered)]

    values = []
    for i in range(7):
        if i == 3:  # verbal_abuse is the 4th category in declaration order
            values += block
        else:
            values += [0.0] * 8
    # Case level: all offender words pooled; all words pooled.
    values.append(score(m1_off + m2_off))
    values.append(score(m1_off + m1_ally + m1_enemy + m2_off + m2_ally + m2_enemy))
    values.append(4.0)  # offender messages in the case
    values.append(7.0)  # total messages in the case
    return values


if __name__ == "__main__":
    for name, values in (
        ("PERFORMANCE_VERBAL_ABUSE", performance_block()),
        ("REPORT_VERBAL_ABUSE", report_block()),
        ("CHAT_FAMILY", chat_family()),
    ):
        print(f"{name} = [")
        for v in values:
            print(f"    {v!r},")
        print("]")
