#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "tdgen.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    if (fread(buf, 1, n, f) != (size_t)n) { fclose(f); free(buf); return NULL; }
    buf[n] = 0;
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 3) return 64;
    char *source = slurp(argv[1]);
    char *schema = slurp(argv[2]);
    if (!source || !schema) return 65;

    TdgProgram *program = NULL;
    if (tdg_program_parse(source, &program) != TDG_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", tdg_last_error());
        return 1;
    }
    char *path = NULL;
    TdgStatus st = tdg_program_run(program, "{\"b\":[2,4],\"n\":2}", 1000, &path);
    if (st != TDG_STATUS_OK) return 2;
    printf("path=%s\n", path);
    tdg_string_free(path);

    TdgProgram *bad = NULL;
    if (tdg_program_parse("fn", &bad) != TDG_STATUS_PARSE_ERROR || bad != NULL) return 3;
    printf("error=%s\n", tdg_last_error());

    uint64_t dims[] = {4, 4, 4};
    TdgHeuristic h;
    if (tdg_predict("matrix", dims, 3, &h) != TDG_STATUS_OK) return 4;
    printf("predict=%llu %llu %llu\n", (unsigned long long)h.k_l, (unsigned long long)h.k_s,
           (unsigned long long)h.l_max);

    TdgCampaign *c = NULL;
    const char *config = "{\"max_size\":3,\"seed\":1}";
    if (tdg_campaign_run(program, schema, config, 2, true, &c) != TDG_STATUS_OK) {
        fprintf(stderr, "campaign: %s\n", tdg_last_error());
        return 5;
    }
    printf("k_L=%lld k_S=%lld paths=%zu\n", (long long)tdg_campaign_k_longest(c),
           (long long)tdg_campaign_k_saturation(c), tdg_campaign_path_count(c));
    char *csv = NULL;
    if (tdg_campaign_report_csv(c, &csv) != TDG_STATUS_OK) return 6;
    printf("header=%.*s\n", (int)strcspn(csv, "\n"), csv);
    tdg_string_free(csv);
    tdg_campaign_free(c);
    tdg_program_free(program);
    free(source);
    free(schema);
    return 0;
}
