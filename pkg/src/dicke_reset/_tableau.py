"""Butcher tableau of the L-stable, stiffly accurate ESDIRK4(3)6L[2]SA pair
(Kennedy & Carpenter). Shared by both kernel backends."""

import math

import numpy as np

GAMMA = 0.25
N_STAGES = 6

A = np.zeros((N_STAGES, N_STAGES))
A[1, :2] = [0.25, 0.25]
A[2, :3] = [-1356991263433 / 26208533697614, -1356991263433 / 26208533697614, 0.25]
A[3, :4] = [-1778551891173 / 14697912885533, -1778551891173 / 14697912885533,
            7325038566068 / 12797657924939, 0.25]
A[4, :5] = [-24076725932807 / 39344244018142, -24076725932807 / 39344244018142,
            9344023789330 / 6876721947151, 11302510524611 / 18374767399840, 0.25]
A[5, :6] = [657241292721 / 9909463049845, 657241292721 / 9909463049845,
            1290772910128 / 5804808736437, 1103522341516 / 2197678446715, -3 / 28, 0.25]

C = np.array([0.0, 0.5, (2 - math.sqrt(2)) / 4, 2012122486997 / 3467029789466, 1.0, 1.0])

# stiffly accurate: weights equal the last row
B = A[-1].copy()
B_HAT = np.array([-71925161075 / 3900939759889, -71925161075 / 3900939759889,
                  2973346383745 / 8160025745289, 3972464885073 / 7694851252693,
                  -263368882881 / 4213126269514, 3295468053953 / 15064441987965])
B_ERR = B - B_HAT

# order of the embedded estimate; the controller exponent is 1 / (ERR_ORDER + 1)
ERR_ORDER = 3
