"""Published reference values reproduced by the table commands.

Each entry records one row of the published computation the CLI table
commands re-run: certified brackets for continued-fraction digit
families (table1), higher-order collocation estimates for the digit set
{1,2} (table2) and piecewise-cubic estimates for {2,4,6,8,10}
(table2b), and certified brackets for the perturbed Cantor family
(table3).  `tol` on the non-certified rows is the match tolerance the
table command asserts; certified brackets are instead checked by
interval intersection (both enclose the same dimension).
"""

ODD_DIGITS_33 = tuple(range(1, 34, 2))
EVEN_DIGITS_34 = tuple(range(2, 35, 2))

# table1: certified brackets, columns (digits, h, lower, upper)
TABLE1 = (
    # table1 row 1
    {"digits": (1, 2), "h": 0.0001,
     "lower": 0.53128050509989, "upper": 0.53128050644980},
    # table1 row 2
    {"digits": (1, 2), "h": 0.00005,
     "lower": 0.53128050598142, "upper": 0.53128050632077},
    # table1 row 3
    {"digits": (1, 3), "h": 0.0001,
     "lower": 0.45448907685942, "upper": 0.45448907780427},
    # table1 row 4
    {"digits": (1, 3), "h": 0.00005,
     "lower": 0.45448907745903, "upper": 0.45448907769761},
    # table1 row 5
    {"digits": (1, 4), "h": 0.0001,
     "lower": 0.41118272409575, "upper": 0.41118272491153},
    # table1 row 6
    {"digits": (1, 4), "h": 0.00005,
     "lower": 0.41118272460331, "upper": 0.41118272480924},
    # table1 row 7
    {"digits": (2, 3), "h": 0.0001,
     "lower": 0.33743678074485, "upper": 0.33743678082457},
    # table1 row 8
    {"digits": (2, 3), "h": 0.00005,
     "lower": 0.33743678079023, "upper": 0.33743678081090},
    # table1 row 9
    {"digits": (2, 4), "h": 0.0001,
     "lower": 0.30631276799370, "upper": 0.30631276807670},
    # table1 row 10
    {"digits": (2, 4), "h": 0.00005,
     "lower": 0.30631276803924, "upper": 0.30631276805816},
    # table1 row 11
    {"digits": (10, 11), "h": 0.0002,
     "lower": 0.14692123539045, "upper": 0.14692123539103},
    # table1 row 12
    {"digits": (10, 11), "h": 0.00005,
     "lower": 0.14692123539076, "upper": 0.14692123539080},
    # table1 row 13
    {"digits": (100, 10000), "h": 0.0004,
     "lower": 0.05224659263866, "upper": 0.05224659263866},
    # table1 row 14
    {"digits": (100, 10000), "h": 0.0001,
     "lower": 0.05224659263866, "upper": 0.05224659263866},
    # table1 row 15
    {"digits": (2, 4, 6, 8, 10), "h": 0.0001,
     "lower": 0.51735703083073, "upper": 0.51735703098246},
    # table1 row 16
    {"digits": (2, 4, 6, 8, 10), "h": 0.00005,
     "lower": 0.51735703091123, "upper": 0.51735703094801},
    # table1 row 17
    {"digits": tuple(range(1, 11)), "h": 0.0001,
     "lower": 0.92573758921886, "upper": 0.92573759153175},
    # table1 row 18
    {"digits": tuple(range(1, 11)), "h": 0.00005,
     "lower": 0.92573759066470, "upper": 0.92573759124295},
    # table1 row 19
    {"digits": ODD_DIGITS_33, "h": 0.0001,
     "lower": 0.77051600758209, "upper": 0.77051600898599},
    # table1 row 20
    {"digits": ODD_DIGITS_33, "h": 0.00005,
     "lower": 0.77051600843322, "upper": 0.77051600878460},
    # table1 row 21
    {"digits": EVEN_DIGITS_34, "h": 0.0001,
     "lower": 0.63347197012177, "upper": 0.63347197028753},
    # table1 row 22
    {"digits": EVEN_DIGITS_34, "h": 0.00005,
     "lower": 0.63347197021161, "upper": 0.63347197025258},
    # table1 row 23
    {"digits": tuple(range(1, 35)), "h": 0.0001,
     "lower": 0.98041962337899, "upper": 0.98041962562238},
    # table1 row 24
    {"digits": tuple(range(1, 35)), "h": 0.00005,
     "lower": 0.98041962476506, "upper": 0.98041962532582},
)

# Best published estimate for the digit set {1,2}; midpoint implied by
# table1 row 2 and confirmed by the degree-5 collocation value.
DIM_12_BEST = 0.5312805062772

# table2: degree-d collocation for digits (1, 2), columns
# (degree, h, value, reported_err); tol is our match tolerance.
TABLE2 = (
    # table2 row 1
    {"degree": 1, "h": 0.01, "value": 0.531282991861209,
     "reported_err": 2.49e-06, "tol": 1e-6},
    # table2 row 2
    {"degree": 2, "h": 0.02, "value": 0.531280509905738,
     "reported_err": 3.63e-09, "tol": 1e-7},
    # table2 row 3
    {"degree": 4, "h": 0.04, "value": 0.531280506277707,
     "reported_err": 5.07e-13, "tol": 1e-9},
    # table2 row 4
    {"degree": 5, "h": 0.05, "value": 0.531280506277198,
     "reported_err": 2.44e-15, "tol": 1e-9},
)

# table2b: piecewise-cubic collocation for digits (2, 4, 6, 8, 10).
TABLE2B = (
    # table2b row 1
    {"degree": 3, "h": 0.1, "value": 0.517357031893604, "tol": 1e-8},
    # table2b row 2
    {"degree": 3, "h": 0.05, "value": 0.517357031040157, "tol": 1e-8},
    # table2b row 3
    {"degree": 3, "h": 0.02, "value": 0.517357030941730, "tol": 1e-8},
    # table2b row 4
    {"degree": 3, "h": 0.01, "value": 0.517357030937109, "tol": 1e-9},
    # table2b row 5
    {"degree": 3, "h": 0.005, "value": 0.517357030937029, "tol": 1e-8},
    # table2b row 6
    {"degree": 3, "h": 0.002, "value": 0.517357030937019, "tol": 1e-8},
    # table2b row 7
    {"degree": 3, "h": 0.001, "value": 0.517357030937018, "tol": 1e-8},
)

# table3: certified brackets for the perturbed Cantor family, columns
# (a, h, lower, upper).
TABLE3 = (
    # table3 row 1
    {"a": 0.0, "h": 0.0001,
     "lower": 0.630929753571456, "upper": 0.630929753571458},
    # table3 row 2
    {"a": 0.25, "h": 0.0001,
     "lower": 0.691029100877742, "upper": 0.691029110502742},
    # table3 row 3
    {"a": 0.5, "h": 0.0001,
     "lower": 0.733474573000780, "upper": 0.733474622222678},
    # table3 row 4
    {"a": 0.75, "h": 0.0001,
     "lower": 0.767207065889322, "upper": 0.767207292955631},
    # table3 row 5
    {"a": 1.0, "h": 0.0001,
     "lower": 0.796726361744928, "upper": 0.796727861914648},
)
