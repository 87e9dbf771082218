# hetero-bi: relativistic heteroclinic transitions
