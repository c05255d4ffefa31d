#include <math.h>
#include <stdio.h>
#include "rieffel_deform.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "failed: %s (%s)\n", #cond,              \
                    rd_last_error_message());                        \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    RdData *data = NULL;
    RdElement *u = NULL, *v = NULL, *uv = NULL, *su = NULL;
    RdState *origin = NULL;
    const int64_t e10[2] = {1, 0}, e01[2] = {0, 1}, e11[2] = {1, 1};
    const double x[2] = {0.0, 0.0};
    double re = 0.0, im = 0.0, lower = 0.0, upper = 0.0;

    CHECK(rd_data_standard(1, 0.5, &data) == RD_STATUS_OK);
    CHECK(rd_element_new(1, &u) == RD_STATUS_OK);
    CHECK(rd_element_new(1, &v) == RD_STATUS_OK);
    CHECK(rd_element_add_term(u, e10, 2, 1.0, 0.0) == RD_STATUS_OK);
    CHECK(rd_element_add_term(v, e01, 2, 1.0, 0.0) == RD_STATUS_OK);

    CHECK(rd_star_product(data, u, v, &uv) == RD_STATUS_OK);
    CHECK(rd_element_coeff(uv, e11, 2, &re, &im) == RD_STATUS_OK);
    CHECK(fabs(re - cos(0.25)) < 1e-15 && fabs(im + sin(0.25)) < 1e-15);

    CHECK(rd_smooth(data, u, &su) == RD_STATUS_OK);
    CHECK(rd_element_coeff(su, e10, 2, &re, &im) == RD_STATUS_OK);
    CHECK(fabs(re - exp(-0.125)) < 1e-15);

    CHECK(rd_state_point(x, 2, &origin) == RD_STATUS_OK);
    CHECK(rd_deformed_evaluate(origin, data, u, &re, &im) == RD_STATUS_OK);
    CHECK(fabs(re - exp(-0.125)) < 1e-15 && im == 0.0);

    CHECK(rd_norm_bracket(data, u, 4, &lower, &upper) == RD_STATUS_OK);
    CHECK(lower == 1.0 && upper == 1.0);
    CHECK(rd_norm_bracket(data, uv, 0, &lower, &upper) == RD_STATUS_CUTOFF_TOO_SMALL);

    rd_element_free(su);
    rd_element_free(uv);
    rd_element_free(v);
    rd_element_free(u);
    rd_state_free(origin);
    rd_data_free(data);
    printf("ok %s\n", rd_version());
    return 0;
}
