package main

import (
	"context"
	"os"

	"cloud.google.com/go/storage"
)

func Handler(ctx context.Context) error {
	client, err := storage.NewClient(ctx)
	if err != nil {
		return err
	}
	return client.Bucket(os.Getenv("TEMP_BUCKET")).Object("scratch/upload.part").Delete(ctx)
}
