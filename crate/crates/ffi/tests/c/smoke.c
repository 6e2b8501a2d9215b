#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "netmatch.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            char msg[256];                                             \
            nm_last_error_message(msg, sizeof msg);                    \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,    \
                    #cond, msg);                                       \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    NmSample *s = NULL;
    CHECK(nm_sample_simulate(60, "homophily", NULL, 7, &s) == NM_STATUS_OK);
    CHECK(nm_sample_n(s) == 60 && nm_sample_k(s) == 1);

    double *dist = malloc(sizeof(double) * 60 * 60);
    CHECK(nm_codegree_distance(s, dist, 10) == NM_STATUS_BUFFER_TOO_SMALL);
    CHECK(nm_last_error_length() > 0);
    CHECK(nm_codegree_distance(s, dist, 3600) == NM_STATUS_OK);
    CHECK(dist[0] == 0.0 && dist[1] == dist[60]);
    free(dist);

    NmEstimatorConfig cfg = nm_estimator_config_default();
    NmResult *r = NULL;
    CHECK(nm_estimate(s, &cfg, &r) == NM_STATUS_OK);
    double beta;
    CHECK(nm_result_beta(r, &beta, 1) == NM_STATUS_OK);
    CHECK(isfinite(beta));
    CHECK(nm_result_n(r) == 60);
    printf("beta_hat=%.6f converged=%d\n", beta, nm_result_converged(r));
    nm_result_free(r);
    nm_sample_free(s);

    CHECK(nm_sample_simulate(10, "nope", NULL, 1, &s) == NM_STATUS_CONFIG);
    CHECK(nm_sample_simulate(10, NULL, NULL, 1, &s) == NM_STATUS_NULL_POINTER);
    CHECK(fabs(nm_kernel_weight(0.0, 0.05) - 0.75) < 1e-15);
    return 0;
}
