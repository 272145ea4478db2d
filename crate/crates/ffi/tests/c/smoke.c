#include <stdio.h>
#include <stdlib.h>
#include "sfcavail.h"

int main(int argc, char **argv) {
    if (argc < 2) return 10;
    SfcChain *chain = NULL;
    if (sfc_chain_from_file(argv[1], &chain) != SFC_STATUS_OK) {
        fprintf(stderr, "%s\n", sfc_last_error());
        return 11;
    }
    uint32_t l[5] = {2, 3, 3, 3, 3};
    double a = 0.0;
    if (sfc_chain_availability(chain, l, 5, &a) != SFC_STATUS_OK) return 12;

    SfcOptimum *opt = NULL;
    if (sfc_chain_optimize(chain, 0.0, &opt) != SFC_STATUS_OK) return 13;
    size_t n = 0;
    double cost = 0.0;
    sfc_optimum_count(opt, &n);
    sfc_optimum_min_cost(opt, &cost);
    printf("availability %.9f optima %zu cost %.0f version %s\n", a, n, cost, sfc_version());
    sfc_optimum_free(opt);
    sfc_chain_free(chain);
    return 0;
}
