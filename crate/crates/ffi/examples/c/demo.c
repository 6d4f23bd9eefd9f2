#include <stdio.h>
#include <string.h>
#include "xxz_bethe.h"

int main(void) {
    printf("version %s\n", xxz_version());
    const char *cfg =
        "{\"gamma\":[0.7,0],\"kappa\":[1.3,0],"
        "\"sites\":[{\"spin\":\"1/2\",\"z\":[1,0]},{\"spin\":\"1/2\",\"z\":[2.3,0]}],\"k\":1}";
    XxzChain *chain = NULL;
    if (xxz_chain_new(cfg, &chain) != XXZ_STATUS_OK) {
        fprintf(stderr, "chain_new failed: %s\n", xxz_last_error());
        return 1;
    }
    printf("dimension %zu, sector dim k=1: %zu\n",
           xxz_chain_dimension(chain), xxz_chain_weight_sector_dim(chain, 1));
    double re, im;
    xxz_chain_script_a(chain, 1.0, 0.0, &re, &im);
    printf("scriptA(1) = %.6f + %.6fi\n", re, im);
    xxz_chain_free(chain);

    char *report = NULL;
    XxzStatus st = xxz_run_json("solve", cfg, &report);
    printf("solve status %d, report bytes %zu\n", (int)st, report ? strlen(report) : 0);
    int ok = st == XXZ_STATUS_OK && report && strstr(report, "\"pass\": true") != NULL;
    xxz_string_free(report);
    printf(ok ? "C ABI smoke test OK\n" : "C ABI smoke test FAILED\n");
    return ok ? 0 : 1;
}
