#include <stdio.h>
#include "branched_rough.h"

int main(void) {
    const double xs[] = {0.0, 0.0, 0.5, 0.25, -0.25, 0.75, 0.125, 0.5};
    BrpRoughPath *x = NULL;
    if (brp_lift(NULL, xs, 4, 2, 2.5, &x) != BRP_STATUS_OK) {
        fprintf(stderr, "lift: %s\n", brp_last_error());
        return 1;
    }
    double v = 0.0;
    if (brp_p_variation(x, 2.5, &v) != BRP_STATUS_OK || !(v > 0.0)) {
        return 2;
    }
    if (brp_p_variation(NULL, 2.5, &v) != BRP_STATUS_NULL_POINTER) {
        return 3;
    }
    int32_t pass = 0;
    if (brp_check_algebra(2, 2, 1, &pass, NULL) != BRP_STATUS_OK || pass != 1) {
        return 4;
    }
    printf("%zu %.17g\n", brp_rough_path_len(x), v);
    brp_rough_path_free(x);
    return 0;
}
