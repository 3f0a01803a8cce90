"""Frozen reference coefficient sets shared across test modules.

These were solved offline and are treated as ground truth; tests verify
that the library reproduces, measures, and certifies them rather than
re-deriving the numbers.
"""

from __future__ import annotations

from qexpsum import ExpSum

# Minimax absolute-error approximations of Q with d(0) = -d_max.
ABS_APPROX = {
    2: ExpSum(
        (
            (3.736889599671366e-1, 8.179084584179674e-1),
            (1.167651897698837e-1, 1.645047046852372e1),
        )
    ),
    3: ExpSum(
        (
            (3.259195350781647e-1, 7.051797307608448e-1),
            (1.302528627687561e-1, 5.489376068647640e0),
            (4.047435009465072e-2, 1.335391071637174e2),
        )
    ),
    4: ExpSum(
        (
            (2.936683276537767e-1, 6.517755981618476e-1),
            (1.357580421878250e-1, 3.250040490513459e0),
            (5.245255757691102e-2, 3.186882707224491e1),
            (1.673209873360605e-2, 7.786613983601425e2),
        )
    ),
}

# Minimax relative-error approximation with r(0) = 0 on [0, 6], N = 20.
# Rates span nine decades; the first error ripple sits near x = 8e-6.
REL_N20_X6 = ExpSum(
    (
        (7.558818716991463e-2, 5.071654316592885e-1),
        (7.283303478836754e-2, 5.678040654656637e-1),
        (6.886155063785772e-2, 7.104625738749141e-1),
        (6.439172935348138e-2, 9.994060383297402e-1),
        (5.779242444673264e-2, 1.601184575755943e0),
        (4.808415837769939e-2, 2.928772702717808e0),
        (3.692309273438261e-2, 6.019071014437780e0),
        (2.656563850645104e-2, 1.358210951915055e1),
        (1.820530043799255e-2, 3.304520236491907e1),
        (1.201348364882034e-2, 8.584892772825742e1),
        (7.675500579336059e-3, 2.375751011169581e2),
        (4.755522827095319e-3, 7.025476884457923e2),
        (2.853832378872099e-3, 2.237620299200472e3),
        (1.652925274323080e-3, 7.776239381556935e3),
        (9.183202474880042e-4, 3.007617539336614e4),
        (4.846308477760495e-4, 1.334789827558299e5),
        (2.391717111298367e-4, 7.146006517383908e5),
        (1.074573496224467e-4, 5.056149657406912e6),
        (4.174113678130675e-5, 5.790627530626244e7),
        (1.229754587599716e-5, 2.138950747557404e9),
    )
)

# Two-term literature comparison set (an approximation: it undershoots Q
# at the origin by 1/6) and the two-term right-endpoint rectangle rule
# on the half-angle integral, which is a genuine upper bound.
CHIANI_N2 = ExpSum(((1.0 / 12.0, 0.5), (0.25, 2.0 / 3.0)))
RECT_N2 = ExpSum(((0.25, 0.5), (0.25, 1.0)))
